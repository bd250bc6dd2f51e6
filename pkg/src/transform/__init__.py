from .zvonkin import (
    TransformTable,
    build_transform,
    dump_transform_csv,
    eval_b,
    eval_G,
    eval_Ginv,
    eval_Gprime,
)

__all__ = [
    'TransformTable', 'build_transform', 'dump_transform_csv',
    'eval_b', 'eval_G', 'eval_Ginv', 'eval_Gprime',
]
