"""Exception hierarchy.

Every error raised on bad input derives from :class:`DataError`, which the
command-line front end maps to exit status 2.
"""


class DataError(Exception):
    """Base class for all input and data errors."""


class MalformedRow(DataError):
    def __init__(self, line, reason, path=None):
        self.line = line
        self.reason = reason
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {reason}")


class UnknownCell(DataError):
    def __init__(self, cell_id):
        self.cell_id = cell_id
        super().__init__(f"unknown cell {cell_id!r}")


class UnknownClient(DataError):
    def __init__(self, client_id):
        self.client_id = client_id
        super().__init__(f"unknown client {client_id!r}")


class EmptyDataset(DataError):
    pass


class UngroupedClient(DataError):
    def __init__(self, client_id):
        self.client_id = client_id
        super().__init__(f"client {client_id!r} has events but no group")


class TooLarge(DataError):
    pass


class InsufficientClients(DataError):
    pass


class NonTermination(DataError):
    pass


class EmptySegment(DataError):
    def __init__(self, segment):
        self.segment = segment
        super().__init__(f"segment {segment!r} has no members")


class EmptyInfrastructure(DataError):
    pass


class ZeroPopulation(DataError):
    pass


class UnknownSegment(DataError):
    def __init__(self, segment):
        self.segment = segment
        super().__init__(f"unknown segment {segment!r}")


class InvalidConfig(DataError):
    pass
