
try:
    from setuptools import setup, find_packages
except ImportError:
    from distutils.core import setup

setup(
    description='Conic Blackwell Algorithm framework for saddle-point problems',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    author='cba_engpro',
    version='0.1.0',
    license='MIT',
    keywords='saddle point regret minimization blackwell approachability matrix games robust optimization',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Documentation :: Sphinx',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules'
    ],
    install_requires=[
        'numpy',
        'pandas',
        'scipy'
    ],
    extras_require={
        'tests': [
            'pytest',
            'hypothesis'
        ]
    },
    entry_points={
        'console_scripts': [
            'cba = cba.cli:main'
        ]
    },
    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
    scripts=[],
    name='cba_framework',
    include_package_data=True
)
