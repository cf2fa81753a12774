def config_error(error):
    return "Invalid config: {field}: {reason}".format(field=error.field, reason=error.reason)


def capacity_error(error):
    return "Capacity exceeded: {error}".format(error=error)


def valuation_error(error):
    return "Run failed ({kind}): {error}".format(kind=type(error).__name__, error=error)


def run_finished(out_dir, method, samples):
    return "Valued {samples} test samples with {method}; artifacts in {out_dir}".format(
        samples=samples, method=method, out_dir=out_dir)


def compare_finished(path, runs):
    return "Compared {runs} runs; wrote {path}".format(runs=runs, path=path)


def timing_order_violation(slower, faster, slower_seconds, faster_seconds):
    return ("{faster} took {faster_seconds:.3f}s, more than {slower} at {slower_seconds:.3f}s "
            "plus slack").format(slower=slower, faster=faster, slower_seconds=slower_seconds,
                                 faster_seconds=faster_seconds)


def oracle_table(values):
    lines = ["{:>6} {:>14} {:>14} {:>14}".format("player", "exact", "loo", "tmc")]
    for i, (exact, loo, tmc) in enumerate(zip(values["exact"], values["loo"], values["tmc"])):
        lines.append("{:>6} {:>14.9f} {:>14.9f} {:>14.9f}".format(i, exact, loo, tmc))
    return "\n".join(lines)


def oracle_summary(v_one, v_zero, gap):
    return "v(1) = {v_one:.9f}, v(0) = {v_zero:.9f}, efficiency gap {gap:.3e}".format(
        v_one=v_one, v_zero=v_zero, gap=gap)
