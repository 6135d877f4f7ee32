from .density import CollisionByDegree, Degradation, DenseMesh, FiveNodeMeshes, LargeMeshes
from .suite import Suite, SuiteSettings
from .throughput import (
    CompleteGraph4,
    DynamicLoad,
    HeterogeneousLine3,
    HeterogeneousLine4,
    HomogeneousLine3,
    Line4,
)


def _get_suites():
    suites = {}
    for cls in (
        HomogeneousLine3,
        HeterogeneousLine3,
        DynamicLoad,
        CompleteGraph4,
        Line4,
        HeterogeneousLine4,
        FiveNodeMeshes,
        LargeMeshes,
        DenseMesh,
        Degradation,
        CollisionByDegree,
    ):
        ns = cls.namespace()
        dup = suites.get(ns)
        if dup is None:
            suites[ns] = cls
        else:
            raise RuntimeError(f"suites key {ns} is not unique ({cls} and {dup})")
    return suites


SUITES = _get_suites()
