//! Every example runs to completion.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example();
        }
    };
}

example!(anti_kaehler_identities);
example!(sphere_quadric);
example!(metric_extension);
example!(polar_map);
example!(complex_jacobi_fields);
example!(focal_radii);
example!(orbit_classification);
example!(dual_space);
