from collections import OrderedDict

from .. import Tensor, _utils


class Parameter(Tensor):
    def __init__(self, data):
        super().__init__(data._storage.data, data._size)
        self.requires_grad = True

    def __reduce_ex__(self, protocol):
        plain = Tensor(self._storage.data, self._size)
        plain._storage = self._storage
        return (_utils._rebuild_parameter, (plain, self.requires_grad, OrderedDict()))


class Module:
    def __init__(self):
        object.__setattr__(self, "training", True)
        object.__setattr__(self, "_parameters", OrderedDict())
        object.__setattr__(self, "_buffers", OrderedDict())
        object.__setattr__(self, "_modules", OrderedDict())

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        else:
            object.__setattr__(self, name, value)

    def __getattr__(self, name):
        for table in ("_parameters", "_modules"):
            values = self.__dict__.get(table)
            if values is not None and name in values:
                return values[name]
        raise AttributeError(name)

    def state_dict(self, prefix=""):
        out = OrderedDict()
        for name, p in self._parameters.items():
            plain = Tensor(p._storage.data, p._size)
            plain._storage = p._storage
            out[prefix + name] = plain
        for name, m in self._modules.items():
            out.update(m.state_dict(prefix + name + "."))
        return out
