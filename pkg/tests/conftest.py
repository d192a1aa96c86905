import pytest


@pytest.fixture(autouse=True)
def _nose_style_setup_teardown(request):
    """Run nose-style ``setup``/``teardown`` methods, which pytest >= 8 no longer calls."""
    instance = request.instance
    setup = getattr(instance, "setup", None) if instance is not None else None
    teardown = getattr(instance, "teardown", None) if instance is not None else None
    if callable(setup):
        setup()
    yield
    if callable(teardown):
        teardown()
