import configparser
import os


def load_config():
    this_dir = os.path.dirname(os.path.abspath(__file__))
    config_file = os.path.join(this_dir, "conf", "config.cfg")
    if not os.path.exists(config_file):
        config_file = os.path.join(this_dir, "conf", "config.cfg.example")
    config = configparser.ConfigParser()
    config.read(config_file)
    verify_factorizations = config.get("defaults", "verify_factorizations", fallback="yes")
    if verify_factorizations.lower() in ["true", "y", "yes"]:
        verify_factorizations = True
    else:
        verify_factorizations = False
    output_format = config.get("defaults", "output_format", fallback="json").lower()
    if output_format not in ["json", "csv"]:
        output_format = "json"
    return {
        "max_size": config.getint("defaults", "max_size", fallback=10**6),
        "output_format": output_format,
        "workers": config.getint("defaults", "workers", fallback=4),
        "log_level": config.get("defaults", "log_level", fallback="WARNING").upper(),
        "verify_factorizations": verify_factorizations
    }
