#
# uavrelay documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
from __future__ import annotations

import os.path as osp
import shutil
import sys

HERE = osp.abspath(osp.dirname(__file__))
ROOT = osp.dirname(osp.dirname(HERE))
sys.path.insert(0, ROOT)

from uavrelay import __version__, version_info  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = [
    "myst_parser",
    "traitlets.config.sphinxdoc",
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
]

source_suffix = [".rst", ".md"]

# Add dev disclaimer.
if isinstance(version_info[-1], str):
    rst_prolog = """
    .. note::
        This documentation is for a development version of uavrelay.
    """

master_doc = "index"

project = "uavrelay"
copyright = "2024, The uavrelay Development Team"
author = "The uavrelay Development Team"

version = ".".join(map(str, version_info[:2]))
release = __version__

language = "en"
pygments_style = "sphinx"
todo_include_todos = False

autodoc_member_order = "bysource"

# -- Options for HTML output ----------------------------------------------

html_theme = "pydata_sphinx_theme"
html_theme_options = {"navigation_with_keys": False}
htmlhelp_basename = "uavrelaydoc"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "traitlets": ("https://traitlets.readthedocs.io/en/stable/", None),
}


CONFIG_PREAMBLE = """\
Every option can be set in a config file as ``c.<Class>.<name> = value`` or on the
command line as ``--<Class>.<name>=value``. Command line values win."""


def setup(app):
    from traitlets.config.sphinxdoc import write_doc

    from uavrelay.app import RunApp

    write_doc(osp.join(HERE, "config.rst"), "Configuration options", RunApp(), CONFIG_PREAMBLE)
    shutil.copy(osp.join(ROOT, "CHANGELOG.md"), osp.join(HERE, "changelog.md"))
