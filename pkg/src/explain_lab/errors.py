"""
Exception hierarchy shared by every `explain_lab` package
"""

from pathlib import Path


class ExplainLabError(Exception):
    """
    Base class of every error raised on purpose by `explain_lab`
    """


class DimensionError(ExplainLabError, ValueError):
    """
    Array shapes do not chain (layer sizes, feature counts, class counts)
    """


class ContractError(ExplainLabError):
    """
    An object was used outside the protocol it was created for,
    e.g. a backward pass fed with a cache from another forward pass
    """


class NumericError(ExplainLabError, ArithmeticError):
    """
    A NaN or an infinity appeared where finite values are required
    """


class ParameterError(ExplainLabError, ValueError):
    """
    A caller supplied argument lies outside its documented domain
    """


class FormatError(ExplainLabError):
    """
    A file does not follow its binary or text format

    Parameters
    ----------
    `message` `str` What is wrong
    `path` `Path | None` The offending file
    `offset` `int | None` Byte offset at which parsing stopped
    """

    def __init__(
        self, message: str, path: Path | str | None = None, offset: int | None = None
    ) -> None:
        self.path = None if path is None else Path(path)
        self.offset = offset
        where = []
        if self.path is not None:
            where.append(str(self.path))
        if offset is not None:
            where.append(f"byte offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DivergedError(NumericError):
    """
    Training produced a non-finite loss
    """

    def __init__(self, epoch: int, loss: float) -> None:
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"training diverged at epoch {epoch} (loss={loss})")


class KernelTooNarrowError(ExplainLabError):
    """
    Every perturbed sample received a negligible kernel weight
    """


class IllConditionedError(ExplainLabError, ArithmeticError):
    """
    The weighted design matrix is singular and no ridge penalty was given
    """


class ConfigValidationError(ExplainLabError, ValueError):
    """
    A configuration value failed validation

    Parameters
    ----------
    `message` `str` What is wrong
    `key` `str | None` Dotted key, `section.key`
    `line` `int | None` One-based line number in the config file
    """

    def __init__(
        self, message: str, key: str | None = None, line: int | None = None
    ) -> None:
        self.key = key
        self.line = line
        prefix = ""
        if key is not None:
            prefix = f"{key}: "
        if line is not None:
            prefix = f"line {line}: {prefix}"
        super().__init__(f"{prefix}{message}")
