import numpy as np
import pytest

from rejuvkit import Exponential, Hypoexponential, ModelParams


def make_params(
    trigger=30.0,
    c=(0.6, 0.2, 0.2),
    failure=None,
    aging=None,
    fixing=None,
    reboot=None,
    migration=None,
    **overrides,
):
    """Default-settings model: failure law swappable, everything overridable."""
    aging = aging or Exponential(0.0006857)
    failure = failure or Hypoexponential(0.0013674, 0.0043860)
    fixing = fixing or Exponential(1.0)
    reboot = reboot or Exponential(12.0)
    migration = migration or Exponential(120.5)
    kwargs = dict(
        aging_primary=aging,
        aging_backup=aging,
        fail_idle_primary=failure,
        fail_idle_backup=failure,
        fail_migrating_primary=failure,
        fail_migrating_backup=failure,
        fail_fixing_primary=failure,
        fail_fixing_backup=failure,
        fail_reboot_primary=failure,
        fail_reboot_backup=failure,
        fixing_primary=fixing,
        fixing_backup=fixing,
        reboot_primary=reboot,
        reboot_backup=reboot,
        migration=migration,
        a1=trigger,
        a2=trigger,
        a3=trigger,
        a4=trigger,
        a5=trigger,
        a6=trigger,
        c1=c[0],
        c2=c[1],
        c3=c[2],
    )
    kwargs.update(overrides)
    return ModelParams(**kwargs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
