"""Exception hierarchy. Every error carries a stable machine-readable code."""


class SphereQuadError(Exception):
    code = "error"

    def __init__(self, detail="", **context):
        super().__init__(detail or self.code)
        self.detail = detail or self.code
        self.context = context

    def to_json(self):
        return {"error": self.code, "detail": self.detail, "context": self.context}


class ZeroVectorError(SphereQuadError):
    code = "zero_vector"


class AntipodalPointsError(SphereQuadError):
    code = "antipodal_points"


class AntipodalToPoleError(SphereQuadError):
    code = "antipodal_to_pole"


class PointOutsideSimplexError(SphereQuadError):
    code = "point_outside_simplex"


class DegenerateDirectionError(SphereQuadError):
    code = "degenerate_direction"


class OrthogonalityViolatedError(SphereQuadError):
    code = "orthogonality_violated"


class SingularPointError(SphereQuadError):
    code = "singular_point"


class PoleSingularityError(SphereQuadError):
    code = "pole_singularity"


class QuadratureFailureError(SphereQuadError):
    code = "quadrature_failure"


class HypothesisViolatedError(SphereQuadError):
    code = "hypothesis_violated"


class IntegralityDriftError(SphereQuadError):
    code = "integrality_drift"


class IllConditionedGramError(SphereQuadError):
    code = "ill_conditioned_gram"


class PackingFailureError(SphereQuadError):
    code = "packing_failure"


class SeparationCollapseError(SphereQuadError):
    code = "separation_collapse"


class NodeOnMirrorError(SphereQuadError):
    code = "node_on_mirror"


class SymmetryMissingError(SphereQuadError):
    code = "symmetry_missing"


class DomainMismatchError(SphereQuadError):
    code = "domain_mismatch"
