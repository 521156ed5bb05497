from ._ircx import (  # noqa: F401
    ArchiveError,
    ConfigError,
    DataError,
    __version__,
    chamfer,
    cli,
    evaluate,
    extract_analytic,
    extract_mesh,
    fscore,
    generate_scene,
    knn_probe,
    load_features,
    miou,
)
