"""Exception hierarchy for solver and oracle failure modes."""


class BeamformingError(Exception):
    """Base class for all domain errors raised by this package."""


class NoRelays(BeamformingError):
    """Operation needs at least one relay but the network has none."""


class InfeasibleThreshold(BeamformingError):
    """Relay SNR threshold exceeds what full message power can deliver."""


class DegenerateAlpha(BeamformingError):
    """Power split alpha=0 makes the scaled power matrix singular."""


class InfeasibleBudget(BeamformingError):
    """Source budget cannot cancel the noise forwarded at the forced relay amplitudes."""


class NoFeasibleRoot(BeamformingError):
    """No admissible candidate for the reduced one-dimensional magnitude problem."""


class SingularObservation(BeamformingError):
    """Monotonicity threshold is undefined (its denominator vanishes)."""


class OracleEvalError(BeamformingError):
    """A verification oracle hit a non-finite objective evaluation."""


class OracleTooLarge(BeamformingError):
    """Requested oracle run exceeds its built-in cost guard."""
