def _rebuild_tensor_v2(storage, storage_offset, size, stride, requires_grad, backward_hooks):
    raise RuntimeError("stand-in only")


def _rebuild_parameter(data, requires_grad, backward_hooks):
    raise RuntimeError("stand-in only")
