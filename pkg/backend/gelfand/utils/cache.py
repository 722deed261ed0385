from functools import wraps


def cached_on_owner(func):
    """
    把单参数函数的结果挂在参数对象自身上

    结果与参数对象同生命周期，同一对象总是拿到同一个结果；并发首次计算时先写入者胜出。
    依赖对象身份做一致性检查的派生数据（双陪集空间、球函数基、Plancherel 测度）都经由这里缓存。
    """
    attribute = f"_cached_{func.__name__}"

    @wraps(func)
    def wrapper(owner):
        store = owner.__dict__
        if attribute in store:
            return store[attribute]
        return store.setdefault(attribute, func(owner))

    return wrapper
