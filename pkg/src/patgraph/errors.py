"""Exception types raised across the patgraph engine.

Every domain failure derives from :class:`PatGraphError` so callers can
catch one base type at process boundaries (CLI, HTTP service).
"""


class PatGraphError(Exception):
    """Base class for all patgraph domain errors."""


# --- graph store ---------------------------------------------------------

class EmptyLabels(PatGraphError):
    """A node was created without any label."""


class InvalidPropertyValue(PatGraphError):
    """A property value is not text, number, boolean, or list of text."""


class ConstraintViolation(PatGraphError):
    """A write would duplicate a uniqueness-constrained (label, property) value."""


class PreexistingDuplicates(PatGraphError):
    """A constraint cannot be added because current data already violates it."""


class DanglingEndpoint(PatGraphError):
    """An edge references a node id that does not exist."""


class UnknownNode(PatGraphError):
    """No node with the given id."""


class UnknownEdge(PatGraphError):
    """No edge with the given id."""


class NodeInUse(PatGraphError):
    """Node deletion refused: incident edges exist and cascade was not requested."""


class UnknownVariable(PatGraphError):
    """A predicate or return item references a variable the pattern never declares."""


class IoFailure(PatGraphError):
    """Snapshot file could not be read or written."""


class FormatError(PatGraphError):
    """Snapshot content is corrupt or has an unsupported format."""


# --- FAD model -----------------------------------------------------------

class UnknownDesign(PatGraphError):
    """No design with the given unique id."""


class AmbiguousDesign(PatGraphError):
    """A patent and an emerging design share the id; a kind is required."""


class UnknownProduct(PatGraphError):
    """No product with the given id."""


class UnknownGeometry(PatGraphError):
    """An FGI endpoint does not name a geometry of the product."""


class DuplicateProductId(PatGraphError):
    """Product_ID already used within the owning design."""


class DuplicateGeometricId(PatGraphError):
    """Geometric_ID already used within the owning product."""


class InvalidClaim(PatGraphError):
    """Claim text is empty or the claim is otherwise degenerate."""


class BadFunctionId(PatGraphError):
    """Function id string is not of the form fN or fN_bM."""


class CsvFormatError(PatGraphError):
    """Annotation sheet is structurally unreadable (bad header, bad CSV)."""

    def __init__(self, sheet: str, row: int, message: str):
        super().__init__(f"{sheet}:{row}: {message}")
        self.sheet = sheet
        self.row = row


# --- query engine --------------------------------------------------------

class BadRegex(PatGraphError):
    """A regex pattern in a search or predicate does not compile."""


class ParseError(PatGraphError):
    """PatQL text could not be parsed.

    Carries the 1-based position and the token set the parser accepted
    at that point; rendered as ``line:col expected <set>``.
    """

    def __init__(self, line: int, col: int, expected: tuple[str, ...], found: str = ""):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        self.found = found
        detail = f" (found {found})" if found else ""
        super().__init__(f"{line}:{col} expected {', '.join(self.expected)}{detail}")


# --- scoring -------------------------------------------------------------

class EmptyCorpus(PatGraphError):
    """Scoring or normalization was asked to run over zero designs."""


# --- service -------------------------------------------------------------

class BindFailure(PatGraphError):
    """The service could not bind its listen address."""


class SnapshotLoadFailure(PatGraphError):
    """The service refused to start because the snapshot is unreadable."""
