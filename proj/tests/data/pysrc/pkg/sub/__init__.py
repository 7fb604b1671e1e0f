from ..base import Foo as Widget
from .deep import Deep
