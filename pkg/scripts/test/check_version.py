import nnrank.version as version
import os

release_version = os.environ.get("NNRANK_RELEASE_VERSION")

print(f"Package version: {version.__version__}")
print(f"Release version: {release_version}")

assert version.__version__ == release_version
