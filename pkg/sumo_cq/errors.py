class CqError(Exception):
    """Base of every error the pipeline raises on purpose.

    `exit_code` is the category code the command line front-end exits with.
    """
    exit_code = 1
    category = "error"


class ConfigError(CqError):
    exit_code = 2
    category = "config"


class MissingArtifactError(CqError):
    exit_code = 3
    category = "missing-artifact"

    def __init__(self, path, stage):
        super().__init__(f"{path} not found, run the `{stage}` stage first")
        self.path = path
        self.stage = stage


class InputFormatError(CqError):
    exit_code = 4
    category = "input"

    def __init__(self, message, path=None, line=None, column=None):
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
        self.column = column


class WordNetFormatError(InputFormatError):
    pass


class MappingFormatError(InputFormatError):
    pass


class KifSyntaxError(InputFormatError):
    pass


class TptpSyntaxError(InputFormatError):
    pass


class FormulaError(CqError):
    exit_code = 4
    category = "formula"


class SymbolCollisionError(CqError):
    exit_code = 4
    category = "symbol-map"

    def __init__(self, target, first, second):
        super().__init__(f"symbols {first!r} and {second!r} both map to {target!r}")
        self.target = target
        self.sources = (first, second)


class RelationMappedSynset(CqError):
    """Raised for synsets mapped to relations; callers skip the synset."""
    exit_code = 4
    category = "statement"

    def __init__(self, concept, provenance=None):
        super().__init__(f"synset mapped to relation {concept}"
                         + (f" ({provenance})" if provenance else ""))
        self.concept = concept
        self.provenance = provenance


class ProjectionError(CqError):
    exit_code = 4
    category = "projection"


class CorpusError(CqError):
    exit_code = 5
    category = "corpus"


class HarnessError(CqError):
    exit_code = 6
    category = "harness"


class IntegrityError(CqError):
    exit_code = 7
    category = "integrity"
