from setuptools import setup, find_packages
with open('README.md', 'r') as fdesc:
    long_description = fdesc.read()

setup(name='lnn-pinn',
      version='1.0.0',
      author='',
      author_email='',
      url='',
      download_url='',
      packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
      py_modules=['cli', 'utils'],
      long_description=long_description,
      long_description_content_type='text/markdown',
      classifiers=[
          "Programming Language :: Python",
          "Intended Audience :: Science/Research",
          "Topic :: Scientific/Engineering :: Mathematics",
          "Programming Language :: Python :: 3",
      ],
      keywords='physics-informed neural networks, liquid neural networks, finite elements',
      license='MIT',
      install_requires=['matplotlib >= 3.1.0, < 4.0.0',
                        'numpy >= 1.17.0, < 2.0.0',
                        'pandas >= 1.0.0, < 3.0.0',
                        'pyyaml >= 5.1',
                        'scipy >= 1.7.0, < 2.0.0',
                        'tqdm >= 4.0.0',
                        'torch >= 2.0.0'],
      extras_require={'test': ['pytest >= 7.0.0',
                               'hypothesis >= 6.0.0']},
      entry_points={'console_scripts': ['lnn-pinn = cli:main']},
      python_requires='>=3.8, <4.0'
)
