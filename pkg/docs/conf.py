#
# scalelab documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
#
# All configuration values have a default; values that are commented out
# serve to show the default.
import os
import sys

# The package is imported from the source tree.
sys.path.insert(0, os.path.abspath(".."))

from scalelab import __version__

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.doctest",
    "sphinx_rtd_theme",
]

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "index"

project = "scalelab"
copyright = "the scalelab developers"

# The short X.Y version.
version = __version__
# The full version, including alpha/beta/rc tags.
release = version

exclude_patterns = ["_build"]

pygments_style = "sphinx"

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"

htmlhelp_basename = "scalelabdoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    ("index", "scalelab.tex", "scalelab Documentation", "scalelab developers", "manual")
]

# -- Options for manual page output ---------------------------------------

man_pages = [("index", "scalelab", "scalelab Documentation", ["scalelab developers"], 1)]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (
        "index",
        "scalelab",
        "scalelab Documentation",
        "scalelab developers",
        "scalelab",
        "Scaling limits of free and generalized free quantum fields.",
        "Miscellaneous",
    )
]

# -- Options for Epub output ----------------------------------------------

epub_title = "scalelab"
epub_exclude_files = ["search.html"]

doctest_global_setup = """
import math

import scalelab
"""
