"""Shared test configuration: a reproducible hypothesis profile."""

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "repro",
        derandomize=True,
        deadline=None,
        max_examples=50,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("repro")
except ImportError:
    pass
