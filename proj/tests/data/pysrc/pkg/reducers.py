from .base import Foo


def rebuild(*args):
    return args


class Plain:
    def __init__(self, size: int):
        self.size = size

    def __reduce__(self):
        return (rebuild, (self.size, Foo, "tag"), self.__dict__, None, iter([]))


class FromClass:
    def __init__(self):
        self.w: float = 0.0

    def __reduce_ex__(self, protocol):
        return (self.__class__, (self.w,))


class Opaque:
    def __reduce__(self):
        return build_later(self)


class Derived(Plain):
    pass


def build_later(obj):
    return (rebuild, ())
