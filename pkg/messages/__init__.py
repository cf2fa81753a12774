from .cli_messages import *
