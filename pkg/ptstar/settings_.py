from .config import Config, config_field, field_checker, validate_config

__all__ = ['Settings', 'settings']


class Settings(Config):
    """Global settings of the whole `ptstar` package."""

    num_workers: int = config_field(
        default=1,
        envvar='PTSTAR_NUM_WORKERS',
        description='Default number of worker threads for seed polishing, '
                    'sweep rows and verification samples.',
    )

    log_level: str = config_field(
        default='INFO',
        envvar='PTSTAR_LOG_LEVEL',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
    )

    @field_checker('num_workers')
    def _check_num_workers(cls, v):
        if v < 1:
            raise ValueError(f'`num_workers` must be at least 1: got {v!r}')
        return v

    @field_checker('log_level', pre=True)
    def _check_log_level(cls, v):
        return str(v).upper()


settings = validate_config(Settings())
