from setuptools import setup, find_packages

setup(
    name='sumo_cq',
    version='0.1.0',
    packages=find_packages(include=['sumo_cq', 'sumo_cq.*']),
    install_requires=[
        'numpy>=1.19.5',
        'tqdm>=4.45.0',
        'wandb>=0.11.2',
        'smart_open',
        'networkx>=2.5',
        'psutil>=5.8.0',
    ],
    entry_points={
        'console_scripts': ['sumo-cq=sumo_cq.cli:main'],
    },
)
