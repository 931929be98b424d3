# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled arithmetic kernels; API mirrors ``_kernels_py``."""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_DelItem
from cpython.object cimport PyObject


def monomial_key_mul(tuple m1, tuple m2):
    cdef Py_ssize_t i = 0, j = 0, n1 = len(m1), n2 = len(m2)
    cdef long v1, v2
    if n1 == 0:
        return m2
    if n2 == 0:
        return m1
    out = []
    while i < n1 and j < n2:
        t1 = <tuple>m1[i]
        t2 = <tuple>m2[j]
        v1 = t1[0]
        v2 = t2[0]
        if v1 == v2:
            out.append((v1, t1[1] + t2[1]))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(t1)
            i += 1
        else:
            out.append(t2)
            j += 1
    while i < n1:
        out.append(m1[i])
        i += 1
    while j < n2:
        out.append(m2[j])
        j += 1
    return tuple(out)


def sparse_add(dict a, dict b):
    cdef dict out
    cdef PyObject *entry
    if len(b) > len(a):
        a, b = b, a
    out = dict(a)
    for key, coeff in b.items():
        entry = PyDict_GetItem(out, key)
        if entry == NULL:
            PyDict_SetItem(out, key, coeff)
        else:
            c = (<object>entry) + coeff
            if c:
                PyDict_SetItem(out, key, c)
            else:
                PyDict_DelItem(out, key)
    return out


def sparse_neg(dict a):
    cdef dict out = {}
    for key, coeff in a.items():
        PyDict_SetItem(out, key, -coeff)
    return out


def sparse_scale(dict a, k):
    cdef dict out = {}
    if k == 0:
        return out
    for key, coeff in a.items():
        PyDict_SetItem(out, key, coeff * k)
    return out


def sparse_mul(dict a, dict b):
    cdef dict out = {}
    cdef PyObject *entry
    if len(a) == 0 or len(b) == 0:
        return out
    if len(a) < len(b):
        a, b = b, a
    for kb, cb in b.items():
        for ka, ca in a.items():
            key = monomial_key_mul(<tuple>ka, <tuple>kb)
            prod = ca * cb
            entry = PyDict_GetItem(out, key)
            if entry == NULL:
                PyDict_SetItem(out, key, prod)
            else:
                c = (<object>entry) + prod
                if c:
                    PyDict_SetItem(out, key, c)
                else:
                    PyDict_DelItem(out, key)
    return out


def sparse_pow(dict a, k):
    cdef dict result = None
    cdef dict base = a
    cdef unsigned long long e = k
    if e == 0:
        return {(): 1}
    while True:
        if e & 1:
            result = base if result is None else sparse_mul(result, base)
        e >>= 1
        if not e:
            return dict(result)
        base = sparse_mul(base, base)


def zmod_poly_mulmod(tuple a, tuple b, tuple red_rows, modulus):
    cdef Py_ssize_t d = len(a), i, j, t
    cdef long long m, ai, bj, c, rj
    cdef long long conv_c[64]
    cdef long long out_c[32]
    if d <= 32 and modulus <= (<long long>1) << 31:
        # machine-word fast path: products stay below 2^62
        m = modulus
        for i in range(2 * d - 1):
            conv_c[i] = 0
        for i in range(d):
            ai = a[i]
            if ai:
                for j in range(d):
                    bj = b[j]
                    if bj:
                        conv_c[i + j] = (conv_c[i + j] + ai * bj) % m
        for i in range(d):
            out_c[i] = conv_c[i]
        for t in range(d - 2, -1, -1):
            c = conv_c[d + t] % m
            if c:
                row = <tuple>red_rows[t]
                for j in range(d):
                    rj = row[j]
                    if rj:
                        out_c[j] = (out_c[j] + c * rj) % m
        return tuple([out_c[j] % m for j in range(d)])
    return _zmod_poly_mulmod_obj(a, b, red_rows, modulus)


def _zmod_poly_mulmod_obj(tuple a, tuple b, tuple red_rows, modulus):
    cdef Py_ssize_t d = len(a), i, j, t
    conv = [0] * (2 * d - 1)
    for i in range(d):
        ai = a[i]
        if ai:
            for j in range(d):
                bj = b[j]
                if bj:
                    conv[i + j] += ai * bj
    out = conv[:d]
    for t in range(d - 2, -1, -1):
        c = conv[d + t] % modulus
        if c:
            row = <tuple>red_rows[t]
            for j in range(d):
                rj = row[j]
                if rj:
                    out[j] += c * rj
    return tuple([c % modulus for c in out])


def zmod_vec_add(tuple a, tuple b, modulus):
    return tuple([(x + y) % modulus for x, y in zip(a, b)])


def zmod_vec_sub(tuple a, tuple b, modulus):
    return tuple([(x - y) % modulus for x, y in zip(a, b)])


def flat_mul(tuple a, tuple b, tuple struct_rows, modulus):
    cdef Py_ssize_t r = len(a), i, j, k
    cdef long long m, ai_c, bj_c, c_c, rk_c
    cdef long long out_c[36]
    if r <= 36 and modulus <= (<long long>1) << 31:
        m = modulus
        for k in range(r):
            out_c[k] = 0
        for i in range(r):
            ai_c = a[i]
            if ai_c:
                rows_i = <tuple>struct_rows[i]
                for j in range(r):
                    bj_c = b[j]
                    if bj_c:
                        c_c = (ai_c * bj_c) % m
                        row = <tuple>rows_i[j]
                        for k in range(r):
                            rk_c = row[k]
                            if rk_c:
                                out_c[k] = (out_c[k] + c_c * rk_c) % m
        return tuple([out_c[k] for k in range(r)])
    out = [0] * r
    for i in range(r):
        ai = a[i]
        if ai:
            rows_i = <tuple>struct_rows[i]
            for j in range(r):
                bj = b[j]
                if bj:
                    c = (ai * bj) % modulus
                    row = <tuple>rows_i[j]
                    for k in range(r):
                        rk = row[k]
                        if rk:
                            out[k] += c * rk
    return tuple([x % modulus for x in out])
