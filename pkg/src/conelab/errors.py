class ConelabError(Exception):
    pass


class GradeError(ConelabError, ValueError):
    pass


class DimensionError(ConelabError, ValueError):
    pass


class EmptySetError(ConelabError, ValueError):
    pass


class CatalogError(ConelabError, KeyError):
    pass


class ScaleError(ConelabError, ValueError):
    """Scale ladder or integer window finer than the set's sampling resolution allows."""


class InsufficientDataError(ConelabError, ValueError):
    pass


class PointNotOnSetError(ConelabError, ValueError):
    pass


class GraphSplitError(ConelabError, ValueError):
    pass
