from .base import Base, Foo
from .child import Child as PublicChild
from .sub import *
