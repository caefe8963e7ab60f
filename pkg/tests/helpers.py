"""Random catalog and constraint generators shared by property tests."""

from rankfarm.catalog import Catalog, NodeConfig, ServiceOffering
from rankfarm.requirements import FunctionalRequirements, MinNode

SOFTWARE = [("Maya", "2014"), ("Maya", "2015"), ("3ds Max", "2014"), ("Blender", "2.7"), ("Houdini", "13")]
ENGINES = ["V-Ray", "Mental Ray", "Arnold", "Cycles", "RenderMan"]
MODELS = ["IaaS", "PaaS"]


def random_catalog(rng, hierarchy, n=None):
    n = n or int(rng.integers(1, 9))
    offerings = []
    for i in range(n):
        sw = {SOFTWARE[j] for j in range(len(SOFTWARE)) if rng.random() < 0.5}
        eng = {ENGINES[j] for j in range(len(ENGINES)) if rng.random() < 0.5}
        node = NodeConfig(
            memory_gb=float(rng.choice([8, 16, 32, 64])),
            cpu_cores=int(rng.choice([4, 8, 16, 32])),
            disk_gb=float(rng.choice([100, 250, 500, 1000])),
            gpu=bool(rng.random() < 0.5),
        )
        qos = {a.name: float(10 ** rng.uniform(-3, 3)) for a in hierarchy.sub_level}
        offerings.append(
            ServiceOffering(f"S{i:02d}", str(rng.choice(MODELS)), frozenset(sw), frozenset(eng), node, qos)
        )
    return Catalog(tuple(offerings), hierarchy)


def random_constraint_chain(rng):
    """Successively tighter FunctionalRequirements, starting from no constraints."""
    steps = ["software", "engine", "memory", "cores", "disk", "gpu", "model", "software", "engine"]
    rng.shuffle(steps)
    req = FunctionalRequirements()
    chain = [req]
    for step in steps:
        node = req.min_node
        if step == "software":
            pick = SOFTWARE[int(rng.integers(len(SOFTWARE)))]
            req = FunctionalRequirements(req.required_software | {pick}, req.required_engines, node, req.required_model)
        elif step == "engine":
            pick = ENGINES[int(rng.integers(len(ENGINES)))]
            req = FunctionalRequirements(req.required_software, req.required_engines | {pick}, node, req.required_model)
        elif step == "model":
            if req.required_model in (None, "any"):
                req = FunctionalRequirements(req.required_software, req.required_engines, node, str(rng.choice(MODELS)))
        else:
            kw = dict(memory_gb=node.memory_gb, cpu_cores=node.cpu_cores, disk_gb=node.disk_gb, gpu=node.gpu)
            if step == "memory":
                kw["memory_gb"] = max(node.memory_gb, float(rng.choice([8, 16, 32, 64, 128])))
            elif step == "cores":
                kw["cpu_cores"] = max(node.cpu_cores, int(rng.choice([4, 8, 16, 32, 64])))
            elif step == "disk":
                kw["disk_gb"] = max(node.disk_gb, float(rng.choice([100, 250, 500, 1000])))
            else:
                kw["gpu"] = True
            req = FunctionalRequirements(req.required_software, req.required_engines, MinNode(**kw), req.required_model)
        chain.append(req)
    return chain
