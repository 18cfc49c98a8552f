#!/usr/bin/env python
#
# slotlime documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

import slotlime  # noqa: E402

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx.ext.napoleon"]
autodoc_member_order = "bysource"

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "slotlime"
copyright = "2021, daniele de gregorio"
author = "daniele de gregorio"
version = slotlime.__version__
release = slotlime.__version__

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
htmlhelp_basename = "slotlimedoc"

man_pages = [(master_doc, "slotlime", "slotlime Documentation", [author], 1)]
