from setuptools import setup
import pathlib

here = pathlib.Path(__file__).parent.resolve()

long_description = (here / 'README.md').read_text(encoding='utf-8')

# Arguments marked as "Required" below must be included for upload to PyPI.
# Fields marked as "Optional" may be commented out.

setup(
    # This is the name of your project. It will determine how users can
    # install this project, e.g.:
    #
    # $ pip install ifs_density
    name='ifs_density',  # Required

    # Versions should comply with PEP 440:
    # https://www.python.org/dev/peps/pep-0440/
    version='0.1.0',  # Required

    # This corresponds to the "Summary" metadata field:
    # https://packaging.python.org/specifications/core-metadata/#summary
    description='Invariant densities of random affine iterated function systems',  # Optional

    # This field corresponds to the "Description" metadata field:
    # https://packaging.python.org/specifications/core-metadata/#description-optional
    long_description=long_description,  # Optional

    # Denotes that our long_description is in Markdown; valid values are
    # text/plain, text/x-rst, and text/markdown
    long_description_content_type='text/markdown',  # Optional (see note above)

    author='ifs-density developers',  # Optional

    # Classifiers help users find your project by categorizing it.
    #
    # For a list of valid classifiers, see https://pypi.org/classifiers/
    classifiers=[  # Optional
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',

        'License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)',

        # These classifiers are *not* checked by 'pip install'. See instead
        # 'python_requires' below.
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Programming Language :: Python :: 3 :: Only',
    ],

    # included in the wheel
    license_files=['LICENSE.txt'],

    keywords='iterated function system, transfer operator, invariant density, hilbert metric',  # Optional

    # the noise families live in their own subpackage
    packages=["ifs_density", "ifs_density.noise"],  # Required

    # 'pip install' will check this and refuse to install the project if the
    # version does not match.
    python_requires='>=3.9, <4',

    # scipy >= 1.12 for integrate.cumulative_simpson
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.12',
        'StrEnum>=0.4.15'
    ],

    # List additional groups of dependencies here (e.g. development
    # dependencies). Users will be able to install these using the "extras"
    # syntax, for example:
    #
    #   $ pip install ifs_density[dev]
    extras_require={  # Optional
        'dev': ['check-manifest', 'flake8', 'pytest', 'hypothesis'],
        'test': ['coverage', 'pytest', 'hypothesis'],
    },

    entry_points={  # Optional
        'console_scripts': [
            'ifs-density=ifs_density.cli:main',
        ],
    },
)
