import sys

for line in sys.stdin:
    print('{"type": "submit"}', flush=True)
