from setuptools import setup, find_packages

with open('requirements.txt') as f:
    requirements = f.read().splitlines()

dependancies = [line for line in requirements if line and not line.startswith('pytest')]

setup(
    name='bindl',
    version='0.1.0',
    description='Binary dictionary learning with modulo-2 factorizations and MDL model selection',
    packages=find_packages(exclude=['*.test']),
    package_data={'bindl': ['bindl-config.yml']},
    python_requires='>=3.9',
    install_requires=dependancies,
    extras_require={'test': [line for line in requirements if line.startswith('pytest')]},
    entry_points={
        'console_scripts': ['bindl=bindl.core.command:cli'],
    },
)
