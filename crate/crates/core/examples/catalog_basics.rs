//! Builds a small catalog by hand, looks names up and saves it.

use dataspace::catalog::{
    Attribute, AttributeType, Catalog, Constraint, Direction, Element, ElementPath, Entity, Model, Relation,
};
use dataspace::metalang::Comparator;
use dataspace::Value;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut catalog = Catalog::new();
    catalog.upsert(None, Element::Model(Model::new("shop")))?;
    let shop = ElementPath::model("shop");
    let customers = Entity::new("customers")
        .with_attribute(Attribute::new("id", AttributeType::Number))
        .with_attribute(Attribute::new("name", AttributeType::Text));
    let orders = Entity::new("orders")
        .with_attribute(Attribute::new("customer", AttributeType::Reference("customers".into())))
        .with_attribute(Attribute::new("total", AttributeType::Number))
        .with_constraint(Constraint::new("total", Comparator::Ge, Value::number(0.0), "negative total"));
    catalog.upsert(Some(&shop), Element::Entity(customers))?;
    catalog.upsert(Some(&shop), Element::Entity(orders))?;
    catalog.upsert(Some(&shop), Element::Relation(Relation::new("places", "customers", "orders")))?;
    catalog.add_synonym("buyer", ElementPath::entity("shop", "customers"))?;

    let found = catalog.lookup("buyer")?;
    println!("buyer -> {}", found.path);
    for r in catalog.relations_of("shop", "orders", Direction::In)? {
        println!("into orders: {} ({} -> {})", r.name, r.start_entity, r.end_entity);
    }

    // Bad edits are rejected and leave the catalog as it was.
    let err = catalog.upsert(Some(&ElementPath::model("nowhere")), Element::Entity(Entity::new("x")));
    println!("bad upsert: {}", err.unwrap_err());
    println!("audit: {:?}", catalog.audit());

    let dir = std::env::temp_dir().join("dataspace-catalog-basics");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("shop.json");
    catalog.save(&path)?;
    assert_eq!(Catalog::load(&path)?, catalog);
    println!("saved to {}", path.display());
    Ok(())
}
