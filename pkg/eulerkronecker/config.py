''' Configuration handling: packaged YAML defaults, user file, environment, flags.
'''
import os
import copy
import logging

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONF = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'eulerkronecker.yaml')
CACHE_ENV = 'EK_CACHE_DIR'


def _update(base, other):
    for key, value in other.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _update(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path=None, **overrides):
    ''' Load the default configuration and merge a user file and overrides into it.

        Parameters
        ----------
        path : string or None
            Optional YAML file with the same sections as the packaged defaults.
        overrides : dict of dicts
            Section-wise values that win over everything else, e.g.
            ``output={'digits': 10}``. None values are ignored.
    '''
    with open(DEFAULT_CONF) as f:
        conf = yaml.safe_load(f)

    if path is not None:
        logger.debug("Loading configuration file from {}".format(path))
        with open(path) as f:
            user_conf = yaml.safe_load(f) or {}
        _update(conf, user_conf)

    if os.environ.get(CACHE_ENV):
        conf['cache']['directory'] = os.environ[CACHE_ENV]

    for section, values in overrides.items():
        values = {k: v for k, v in (values or {}).items() if v is not None}
        conf.setdefault(section, {})
        _update(conf[section], copy.deepcopy(values))
    return conf
