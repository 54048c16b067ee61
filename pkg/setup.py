# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

with open('README.md') as f:
    readme = f.read()

with open('LICENSE.txt') as f:
    license = f.read()

classifiers = [
    'Development Status :: 3 - Alpha',
    'Intended Audience :: Science/Research',
    'Operating System :: OS Independent',
    'License :: OSI Approved :: MIT License',
    'Programming Language :: Python :: 3.9',
    'Topic :: Scientific/Engineering :: Mathematics',
]

setup(
    name='eitls',
    version='0.1.0',
    description='Level-set reconstruction of conductivity inclusions for continuum-model EIT',
    long_description=readme,
    long_description_content_type='text/markdown',
    author='Erwing Forero',
    author_email='erwingforerocastro@gmail.com',
    license=license,
    keywords=['python', 'eit', 'inverse problems', 'level set', 'finite elements', 'adjoint'],
    classifiers=classifiers,
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.12',
        'pandas>=1.5',
        'pydantic>=2.0',
        'triangle>=20230923',
        'matplotlib>=3.5',
    ],
    extras_require={
        'test': ['pytest>=7.0'],
    },
    entry_points={
        'console_scripts': ['eitls=eitls.cli:main'],
    },
)
