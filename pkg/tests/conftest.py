import pytest

from plexflow.nanopub import generate_profile


@pytest.fixture(scope="session")
def profile():
    return generate_profile("Test Signer", orcid="https://orcid.org/0000-0002-1825-0097")
