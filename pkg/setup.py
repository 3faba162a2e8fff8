from setuptools import setup


try:
    setup(
        name='natscc',
        version='1.0.0',
        packages=['natscc', 'natscc.logs'],
        package_data={'natscc': ['data/*.csv', 'data/*.json', 'data/scenarios/*.csv']},
        python_requires='>=3.10',
        install_requires=[
            'numpy>=1.26',
            'pandas>=2.1',
        ],
        extras_require={'test': ['pytest>=8.0', 'hypothesis>=6.100']},
        entry_points={'console_scripts': [
            'natscc = natscc.cli:natscc_parent',
            'natscc-calibrate = natscc.cli:natscc_calibrate',
            'natscc-run = natscc.cli:natscc_run',
            'natscc-scc = natscc.cli:natscc_scc',
            'natscc-montecarlo = natscc.cli:natscc_montecarlo',
            'natscc-compare = natscc.cli:natscc_compare',
            'natscc-diagnostics = natscc.cli:natscc_diagnostics',
        ]},
    )
    exit(0)
except Exception as error:
    print(f'Failed to setup package: {error}')
    exit(1)
