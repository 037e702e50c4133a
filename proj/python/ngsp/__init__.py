"""Grammar-constrained MAP labeling of region-decomposed 3D shapes."""

try:
    from ._ngsp import (
        DataError,
        GrammarError,
        Grammar,
        GuideDistribution,
        LikelihoodConfig,
        ScoredProposal,
        ScorerBank,
        ScorerError,
        Shape,
        brute_force_assignments,
        builtin_guide,
        corrupt_shape,
        describe_generator,
        export_colored,
        export_colored_ply,
        generate_dataset,
        infer,
        log_guide_prob,
        miou,
        sample_assignments,
        score_geometry,
        score_layout,
        score_region_groups,
        top_k_assignments,
        train_builtin_scorers,
    )
except ImportError:  # running against a build tree where _ngsp is top-level
    from _ngsp import (
        DataError,
        GrammarError,
        Grammar,
        GuideDistribution,
        LikelihoodConfig,
        ScoredProposal,
        ScorerBank,
        ScorerError,
        Shape,
        brute_force_assignments,
        builtin_guide,
        corrupt_shape,
        describe_generator,
        export_colored,
        export_colored_ply,
        generate_dataset,
        infer,
        log_guide_prob,
        miou,
        sample_assignments,
        score_geometry,
        score_layout,
        score_region_groups,
        top_k_assignments,
        train_builtin_scorers,
    )

__all__ = [
    "DataError",
    "GrammarError",
    "Grammar",
    "GuideDistribution",
    "LikelihoodConfig",
    "ScoredProposal",
    "ScorerBank",
    "ScorerError",
    "Shape",
    "brute_force_assignments",
    "builtin_guide",
    "corrupt_shape",
    "describe_generator",
    "export_colored",
    "export_colored_ply",
    "generate_dataset",
    "infer",
    "log_guide_prob",
    "miou",
    "sample_assignments",
    "score_geometry",
    "score_layout",
    "score_region_groups",
    "top_k_assignments",
    "train_builtin_scorers",
]
