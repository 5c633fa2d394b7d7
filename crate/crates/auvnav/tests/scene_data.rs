//! The committed scene documents must stay in lockstep with the builtin
//! definitions.

use auvnav::scene::{builtin_scene, Scene, BUILTIN_SCENES};

#[test]
fn committed_scene_files_match_builtins() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("scenes");
    for name in BUILTIN_SCENES {
        let path = root.join(format!("{name}.toml"));
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing {}: {e}", path.display()));
        let loaded = Scene::load(&text).expect("committed scene parses");
        let builtin = builtin_scene(name).expect("builtin");
        assert_eq!(
            loaded.save(),
            builtin.save(),
            "{name}: scenes/{name}.toml is stale, regenerate it from the builtin"
        );
    }
}

#[test]
fn scene_documents_round_trip() {
    for name in BUILTIN_SCENES {
        let scene = builtin_scene(name).unwrap();
        let reloaded = Scene::load(&scene.save()).unwrap();
        assert_eq!(scene.save(), reloaded.save());
    }
}
