"""Exception types shared across the package."""


class SparkPlanError(Exception):
    """Base class for every error this package raises deliberately."""


# -- profile handling -------------------------------------------------------

class InsufficientData(SparkPlanError):
    """Too few usable observations for a fit or statistic."""


class DegenerateDesign(SparkPlanError):
    """All regressor values are zero, so no slope can be identified."""


class UnknownRddOp(SparkPlanError):
    """A workload references an RDD operation the profile has no mean for."""


class CategoryMismatch(SparkPlanError):
    """Profile and workload belong to different application categories."""


class ProfileNotFound(SparkPlanError):
    """No profile stored under the requested (category, instance type) key."""


class DuplicateProfile(SparkPlanError):
    """Two profiles in one document share a (category, instance type) key."""


# -- catalog ----------------------------------------------------------------

class ParseError(SparkPlanError):
    """A document is malformed; the message names the offending location."""


class DuplicateInstanceType(SparkPlanError):
    """Two catalog entries share an instance type name."""


class UnknownInstanceType(SparkPlanError):
    """A composition references an instance type missing from the catalog."""


# -- planning ---------------------------------------------------------------

class NoProfileForType(SparkPlanError):
    """A catalog type has no matching profile and pooling is disabled."""


class EnumerationCapExceeded(SparkPlanError):
    """The brute-force candidate grid is larger than the configured cap."""


class NoAffordableCluster(SparkPlanError):
    """Even a single node of every type exceeds the cost budget."""


class DidNotConverge(SparkPlanError):
    """The continuous solver hit its iteration cap or found no interior point."""


# -- evaluation -------------------------------------------------------------

class ZeroRecorded(SparkPlanError):
    """A recorded completion time of zero cannot anchor a relative error."""


class EmptyInput(SparkPlanError):
    """A statistic was requested over an empty record list."""


class MissingSlo(SparkPlanError):
    """A record lacks the deadline needed for the satisfaction statistic."""


# -- model ------------------------------------------------------------------

class ComputationOverflow(SparkPlanError):
    """An intermediate result left the representable integer range."""
