"""Shipped datasets and the text data format."""

from .builtin import get, load_builtin, surfaces, threefolds
from .entry import CatalogEntry, Expected
