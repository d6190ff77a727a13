# Discrete action of sampled profiles (forward differences, midpoint F),
# summed exactly in mpmath.
from mpmath import mp, mpf, sin, pi
mp.dps = 30
def energy(vals, l):
    n = len(vals) - 1
    h = mpf(1) / n
    F = lambda t: t**4 / 4 - l * t**6 / 6
    return sum(h * (((vals[i+1] - vals[i]) / h)**2 / 2 - F((vals[i] + vals[i+1]) / 2)) for i in range(n))
n = 512
print('sin, lambda=1   ', energy([sin(pi * i / n) for i in range(n + 1)], 1))
print('2 sin, lambda=0 ', energy([2 * sin(pi * i / n) for i in range(n + 1)], 0))
# Output (frozen in the tests):
#   sin, lambda=1    2.42572698637810934101614825218
#   2 sin, lambda=0  8.36960167255532819338183261929
