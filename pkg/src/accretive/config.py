# src/accretive/config.py
"""Default numerical constants shared by the solver modules."""


class SolverDefaults:
    """Configuration constants for the resolvent, semigroup and majorant solvers."""

    # Resolvent (Newton on the proximal energy)
    RESOLVENT_TOLERANCE = 1e-10
    RESOLVENT_MAX_ITERATIONS = 200
    LINE_SEARCH_HALVINGS = 40
    ARMIJO_SLOPE = 1e-4
    PLAPLACE_REGULARIZATION = 1e-12

    # Accretivity check for LinearMatrix
    ACCRETIVITY_EIGEN_SLACK = 1e-10

    # Crandall-Liggett doubling
    SEMIGROUP_INITIAL_STEPS = 16
    SEMIGROUP_MAX_DOUBLINGS = 12
    SEMIGROUP_TOLERANCE = 1e-5

    # Picard iteration
    PICARD_TOLERANCE = 1e-8
    PICARD_MAX_ITERATIONS = 60
    DOMINATION_SLACK = 1e-8

    # Scalar majorant
    IE_SUBSTEPS = 32
    IE_BLOWUP_CAP = 1e12
    IE_RESIDUAL_FACTOR = 10.0
    PSI_MAX_U = 1e300

    # Perturbation validation
    MODULUS_SAMPLES = 200
    MODULUS_SLACK = 1e-9
