import collections
from collections import deque as dq
from . import base as b
from .base import Foo


class Child(b.Base):
    def __init__(self, name: "str", *rest, **extra):
        super().__init__()
        self.name = name
        self.x = "shadowed"
        self.parts: "collections.OrderedDict[str, Foo]" = collections.OrderedDict()
        self.queue: dq[int] = dq()
        self.kind = Foo
        self.maker = type(self)
        self.a, self.b = 1, b"raw"
        self.rest = rest
