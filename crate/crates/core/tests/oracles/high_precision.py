from mpmath import mp, mpf, quad, findroot, log, exp, sqrt, pi, cosh, floor, polylog
mp.dps = 50
# log_D(3, 100, 1): L = floor(3*10) = 30, x = e^{-1/10}
print("logD_3_100_1", mp.nstr(sum(log(1+exp(-mpf(k)/10)) for k in range(1,31)), 25))
def g(b, t):
    return quad(lambda u: u/(1+exp(b*u)), [0, t])
def beta(t):
    t = mpf(t)
    return findroot(lambda b: g(b, t) - 1, mpf('0.3') if t > 2 else mpf('-0.3'))
for t in ['3', '1.5', '1.7', '4']:
    b = beta(t); t_ = mpf(t)
    bp = b*t_/(2*(1+exp(b*t_)) - t_**2)
    A = cosh(b*t_/2)*sqrt(bp/(pi*t_))
    B = 2*b + t_*log(1+exp(-b*t_))
    print("t", t, "beta", mp.nstr(b, 25), "bp", mp.nstr(bp, 25), "A", mp.nstr(A, 25), "B", mp.nstr(B, 25))
b3 = beta(3)
fr = 3*sqrt(mpf(1000)) - floor(3*sqrt(mpf(1000)))
A3 = cosh(b3*3/2)*sqrt((b3*3/(2*(1+exp(3*b3)) - 9))/(pi*3))
print("frac", mp.nstr(fr, 20), "a_n(3,1000)", mp.nstr(A3*(1+exp(-3*b3))**(-fr), 25))
print("amp2", mp.nstr(sqrt(3/(4*pi)), 25))
print("li2(-1)", mp.nstr(polylog(2,-1), 25))
for x in ['0.3','-0.7','0.9','-5','-30','0.999','-0.5']:
    print("li2", x, mp.nstr(polylog(2, mpf(x)), 25))
