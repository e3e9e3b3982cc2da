# fixsplit/__main__.py
from fixsplit import fixsplit_main

if __name__ == '__main__':
    fixsplit_main()
