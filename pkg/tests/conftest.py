import os

# Tests must be deterministic and must not depend on a developer's local `.env`.
# Pin the settings the engines read before groupoidal.core.settings is imported.
os.environ.setdefault("GROUPOIDAL_SEED", "0")
os.environ.setdefault("GROUPOIDAL_DEFAULT_WINDOW", "8")
os.environ.setdefault("GROUPOIDAL_SAMPLE_BUDGET", "200")
os.environ.setdefault("GROUPOIDAL_TOLERANCE", "1e-12")
os.environ.setdefault("GROUPOIDAL_SPECTRAL_FLOW_STEPS", "64")
os.environ.setdefault("GROUPOIDAL_QUADRATURE_POINTS", "64")
os.environ.setdefault("GROUPOIDAL_STRICT_EMPTY_CLASSES", "false")
os.environ.setdefault("GROUPOIDAL_MAX_WORKERS", "1")
os.environ.setdefault("GROUPOIDAL_LOG_LEVEL", "WARNING")
