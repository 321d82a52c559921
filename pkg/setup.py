from setuptools import setup, find_packages

with open("README.md") as f:
    readme = f.read()

with open("requirements.txt") as f:
    requirements = [line.strip() for line in f if line.strip()]

setup(
    name="K3N_LAT",
    version="0.0.0",
    description="Lattice computations for non-symplectic involutions on "
                "K3^[n]-type manifolds",
    long_description=readme,
    author="Maël LE GALL",
    author_email="mael.le_gall@tutanota.com",
    url="https://github.com/legallm/K3N_LAT",
    license="MIT",
    packages=find_packages(),
    install_requires=[r for r in requirements if r not in ("pytest", "wheel")]
)
