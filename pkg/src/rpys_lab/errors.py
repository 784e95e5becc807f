"""Exception hierarchy shared across the pipeline.

Everything raised on bad *data* (as opposed to programming errors) derives
from RpysError so the CLI and HTTP layers can map it to a single exit code /
status class.
"""


class RpysError(Exception):
    """Base class for data-level errors."""


class NotWosFormat(RpysError):
    """Input is not a Web of Science tagged export."""


class NotScopusFormat(RpysError):
    """Input is not a Scopus CSV export."""


class UnknownFormat(RpysError):
    """Automatic format detection failed."""


class InvalidThreshold(RpysError):
    """Clustering threshold outside (0, 1]."""


class UnknownCluster(RpysError):
    """A decision targets a cluster id absent from the partition."""


class InvalidSplitSubset(RpysError):
    """Split subset is empty, not a subset, or not a proper subset."""


class EmptyCorpus(RpysError):
    """No data to analyze (no publications, or no cluster with a known year)."""


class EmptyPartition(RpysError):
    """Indicator computation on an empty partition."""


class SeriesTooShort(RpysError):
    """Series cannot accommodate the requested segmentation."""


class InvalidK(RpysError):
    """Requested segment count is not a positive integer."""


class CorruptSession(RpysError):
    """Session file failed checksum or structural validation."""


class UnsupportedVersion(RpysError):
    """Session file written by an unknown format version."""
