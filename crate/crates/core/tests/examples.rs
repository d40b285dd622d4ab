// Runs every example program in-process so that a broken example fails the
// test suite, not just the build.

macro_rules! example {
    ($name:ident, $path:literal) => {
        mod $name {
            #![allow(dead_code)]
            include!($path);

            #[test]
            fn runs() {
                main().unwrap();
            }
        }
    };
}

example!(blowup, "../examples/blowup.rs");
example!(closed_form, "../examples/closed_form.rs");
example!(decide, "../examples/decide.rs");
example!(equivalence, "../examples/equivalence.rs");
example!(files, "../examples/files.rs");
example!(range_projection, "../examples/range_projection.rs");
example!(variational, "../examples/variational.rs");
