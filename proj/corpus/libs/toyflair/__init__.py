"""Sequence labelling toolkit modelled on a popular NLP library."""

__version__ = "0.3.1"

from .data import Dictionary
from .embeddings import WordEmbeddings, CharacterEmbeddings, StackedEmbeddings
from .models import SequenceTagger
