"""Exception and warning types shared across the toolkit."""


class RSAError(ValueError):
    """Base class for all toolkit errors."""


class RSAWarning(UserWarning):
    """Recoverable degeneracy (flat rows, empty clusters, failed null draws)."""


# datamodel
class BadMagic(RSAError):
    pass


class ShapeMismatch(RSAError):
    pass


class NonFiniteValue(RSAError):
    pass


class ParseError(RSAError):
    pass


class MissingFile(RSAError):
    pass


class InconsistentLayers(RSAError):
    pass


# preprocess / features
class ZeroVarianceColumn(RSAError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"column {index} has zero variance")


class TooShort(RSAError):
    pass


class BadWindow(RSAError):
    pass


# metrics
class ZeroVariance(RSAError):
    pass


class AllTies(RSAError):
    pass


class DegenerateGram(RSAError):
    pass


# tnc / timewin / synth
class OutOfRange(RSAError):
    pass


class BadBounds(RSAError):
    pass


class AllZero(RSAError):
    pass


# partition
class MissingFeatures(RSAError):
    def __init__(self, sentences, what="features"):
        self.sentences = list(sentences)
        super().__init__(f"missing {what} for sentences: {', '.join(self.sentences)}")


class ZeroVarianceAcrossSentences(RSAError):
    pass
