from .fixsplit import fixsplit_main
