"""Shape constants for the synthetic datasets.

Point counts are fixed by the experiments being reproduced; the shapes
themselves (radii, jitter, separations) are free choices. They are kept here,
in one place, so that runs are auditable. Every shape below is chosen so that
its pieces are pairwise separated and the Silverman bandwidth of a typical draw
lands near the bandwidth used in the original experiments.
"""

RING = {
    "n_ring": 1000,
    "n_center": 200,
    "radius": 1.0,
    "radial_sd": 0.1,
    "center_sd": 0.1,
}

# disks: (center_x, center_y, radius, count)
MICKEY = {
    "disks": [
        (0.0, 0.0, 0.84, 1200),
        (-1.10, 1.10, 0.42, 400),
        (1.10, 1.10, 0.42, 400),
    ],
}

YINGYANG = {
    "n_ring": 2000,
    "ring_radius": 2.5,
    "ring_sd": 0.1,
    # two annular arcs around the origin, centred on the +x and -x axes
    "n_moon": 400,
    "moon_inner": 0.8,
    "moon_outer": 1.4,
    "moon_half_angle": 0.8,
    # two Gaussian nodes on the vertical axis, between the moons' tips
    "n_node": 200,
    "node_y": 1.1,
    "node_sd": 0.15,
}
