"""Independent reimplementation of the counter-based stream used to freeze test values."""

M = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SALT = 0xD1B54A32D192ED03


def mix64(x):
    x &= M
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & M
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & M
    x ^= x >> 31
    return x


class Stream:
    def __init__(self, seed, stream):
        self.seed, self.stream = seed, stream
        self.key = mix64(seed ^ mix64(stream + SALT)) | 1
        self.counter = 0

    def split(self, child):
        return Stream(self.seed, mix64((self.stream * GOLDEN + child + 1) & M))

    def next(self):
        self.counter += 1
        return mix64(self.key + self.counter * GOLDEN)

    def uniform_int(self, lo, hi):
        span = hi - lo + 1
        limit = M - (M % span)
        x = self.next()
        while x >= limit:
            x = self.next()
        return lo + x % span


if __name__ == "__main__":
    s = Stream(42, 7)
    print("next_u64(42, 7):", [hex(s.next()) for _ in range(3)])
    c = Stream(42, 7).split(3)
    print("split(3):", [hex(c.next()) for _ in range(2)])
    u = Stream(0, 0)
    print("uniform_int(0, 0) in [1, 6]:", [u.uniform_int(1, 6) for _ in range(8)])
