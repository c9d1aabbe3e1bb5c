import os
import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

ROOT = Path(__file__).resolve().parent.parent

# Distribution name -> import name, where they differ
IMPORT_NAMES = {"python-dotenv": "dotenv", "pyyaml": "yaml"}
TEST_ONLY = {"pytest"}


def requirement_names(lines):
    names = []
    for line in lines:
        line = line.strip().strip('",')
        if line and not line.startswith("#"):
            names.append(re.split(r"[<>=!~\[ ]", line, maxsplit=1)[0].lower())
    return names


def pyproject_dependencies():
    text = (ROOT / "pyproject.toml").read_text()
    block = re.search(r"^dependencies = \[(.*?)^\]", text, re.MULTILINE | re.DOTALL)
    return requirement_names(block.group(1).splitlines())


def source_text():
    files = list((ROOT / "lib").rglob("*.py")) + [ROOT / "run_correlations.py"]
    return "\n".join(path.read_text() for path in files)


class TestManifest:
    def setup_method(self):
        self.requirements = requirement_names((ROOT / "requirements.txt").read_text().splitlines())
        self.dependencies = pyproject_dependencies()

    def test_requirements_match_pyproject(self):
        assert sorted(self.requirements) == sorted(self.dependencies)

    def test_build_backend_is_not_a_runtime_dependency(self):
        assert "setuptools" not in self.dependencies
        assert "setuptools" not in self.requirements

    @pytest.mark.parametrize("name", pyproject_dependencies())
    def test_runtime_dependency_is_imported(self, name):
        if name in TEST_ONLY:
            pytest.skip("test tooling")
        module = IMPORT_NAMES.get(name, name)
        assert re.search(rf"^\s*(import|from) {module}\b", source_text(), re.MULTILINE), name
